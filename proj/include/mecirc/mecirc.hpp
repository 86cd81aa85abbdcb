#ifndef MECIRC_MECIRC_HPP
#define MECIRC_MECIRC_HPP

#include "error.hpp"
#include "block_mat.hpp"
#include "band_data.hpp"
#include "block_circulant.hpp"
#include "toeplitz_ext.hpp"
#include "cme_solver.hpp"
#include "ips.hpp"
#include "feasibility.hpp"
#include "random_instance.hpp"

#endif  // MECIRC_MECIRC_HPP
