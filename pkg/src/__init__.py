# ptomit package
