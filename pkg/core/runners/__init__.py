# 运行器模块
