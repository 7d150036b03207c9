# Numerical services