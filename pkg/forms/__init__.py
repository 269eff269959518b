# Forms package: command-line parameter parsing and validation
