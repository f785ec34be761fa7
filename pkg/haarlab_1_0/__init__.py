# -*- coding: utf-8 -*-
"""
haarlab_1_0
-----------
二进 Haar shift / A2 权 / Bellman 函数 transference 的桌面级数值工作台。

子包：
- core          二进格点、StepFunction、Haar 展开
- weights       A2 权、A2 范数、权生成器
- operators     乘子 / 初等 shift / 一般 Haar shift / paraproduct
- specnorm      加权算子范数 + 扫描实验
- remodel       d 维方块 -> 直线区间的 remodeling
- bellman       Bellman 定义域、候选函数、DP、二次型
- transference  plank 泛函、修正鞅、主估计链
- tools_cli     命令行子命令
"""

VERSION = "haarlab/1.0"
