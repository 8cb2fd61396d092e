# 工具模块