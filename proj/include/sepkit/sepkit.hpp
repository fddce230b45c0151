#pragma once

#include "sepkit/errors.hpp"
#include "sepkit/rational.hpp"
#include "sepkit/prec_real.hpp"
#include "sepkit/special.hpp"
#include "sepkit/polynomial.hpp"
#include "sepkit/rationalize.hpp"
#include "sepkit/linear_fit.hpp"
#include "sepkit/exact_linalg.hpp"
#include "sepkit/hypergeometric.hpp"
#include "sepkit/moments.hpp"
#include "sepkit/density.hpp"
#include "sepkit/closedforms.hpp"
#include "sepkit/recurrence.hpp"
#include "sepkit/montecarlo.hpp"
#include "sepkit/asymptotics.hpp"
#include "sepkit/io.hpp"
#include "sepkit/cache.hpp"
