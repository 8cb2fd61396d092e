# 解析器模块