# 配置模块