# 服务模块