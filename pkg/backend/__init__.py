# Trispin backend package
