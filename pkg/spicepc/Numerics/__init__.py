from spicepc.Numerics.DenseLinalg import (
    solve_spd, spectral_norm_sq, frobenius_norm_sq, jacobian_norm_sq
)
from spicepc.Numerics.SeededRng import SeededRng, gaussian_matrix, gaussian_vector
