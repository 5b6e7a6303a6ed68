#pragma once

#include "dispersim/common.hpp"

namespace dispersim {

// Unnormalized in-place DFTs (FFTW under the hood, plans cached per size).
// forward:  a_k <- sum_j a_j e^{-2 pi i jk/N}
// backward: a_j <- sum_k a_k e^{+2 pi i jk/N}
// Plans are created with FFTW_ESTIMATE so results are reproducible run to run.
void fft_forward(cvec& a);
void fft_backward(cvec& a);

}  // namespace dispersim
