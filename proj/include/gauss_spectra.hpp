#pragma once

#include "gauss_spectra/cf_core.hpp"
#include "gauss_spectra/chebyshev.hpp"
#include "gauss_spectra/errors.hpp"
#include "gauss_spectra/special_fn.hpp"
#include "gauss_spectra/spectrum.hpp"
#include "gauss_spectra/transfer_op.hpp"
