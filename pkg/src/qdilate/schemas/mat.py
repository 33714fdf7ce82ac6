import numpy as np
import numpy.typing as npt

# Dense complex matrix; the carrier for every operator in the package.
Mat = npt.NDArray[np.complex128]
