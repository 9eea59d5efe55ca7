"""bdk: numerical lab for the generalized Becker-Doring coagulation-fragmentation system."""
