# 适配器模块