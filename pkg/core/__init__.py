# 核心模块