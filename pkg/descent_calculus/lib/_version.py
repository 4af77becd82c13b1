__descent_calculus_version='0.3.0+local'