"""Klein-Gordon 守恒流, 内积与规范对称性的数值验证"""
