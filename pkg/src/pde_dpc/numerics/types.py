"""Array aliases for fields and actuator amplitudes."""

import numpy as np
import numpy.typing as npt

Array = npt.NDArray[np.float64]

# u on the grid, shape (n_x,) or (batch, n_x)
Field = Array

# actuator amplitudes, shape (n,) or (batch, n)
ControlAmplitudes = Array
