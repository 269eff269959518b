# Utils package for the convolution-power engine
