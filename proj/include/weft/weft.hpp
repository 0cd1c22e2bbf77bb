#ifndef WEFT_WEFT_HPP
#define WEFT_WEFT_HPP

#include "types.hpp"
#include "numerics.hpp"
#include "rng.hpp"
#include "model.hpp"
#include "weights.hpp"
#include "fock.hpp"
#include "points.hpp"
#include "dilation.hpp"
#include "duality.hpp"
#include "crossed.hpp"
#include "report.hpp"
#include "io.hpp"
#include "verify.hpp"

#endif
