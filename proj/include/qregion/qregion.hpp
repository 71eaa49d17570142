#pragma once

#include "qregion/errors.hpp"
#include "qregion/special.hpp"
#include "qregion/parallel.hpp"
#include "qregion/fock.hpp"
#include "qregion/geometry.hpp"
#include "qregion/region_ops.hpp"
#include "qregion/cpti.hpp"
#include "qregion/spectra.hpp"
#include "qregion/dsl.hpp"
#include "qregion/io.hpp"
#include "qregion/verify.hpp"
