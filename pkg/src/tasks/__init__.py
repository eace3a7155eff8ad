"""Jobs that drive the domain packages: training, evaluation and search."""
