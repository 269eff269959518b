# Models package: lattice functions, series, maximizers, exponents, quadrature and envelopes
