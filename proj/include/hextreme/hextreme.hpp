#ifndef HEXTREME_HEXTREME_HPP
#define HEXTREME_HEXTREME_HPP

#include "hextreme/describe.hpp"
#include "hextreme/dist.hpp"
#include "hextreme/error.hpp"
#include "hextreme/estimate.hpp"
#include "hextreme/gof.hpp"
#include "hextreme/hfunc.hpp"
#include "hextreme/kernel.hpp"
#include "hextreme/optimize.hpp"
#include "hextreme/param.hpp"
#include "hextreme/quadrature.hpp"
#include "hextreme/random.hpp"
#include "hextreme/specfun.hpp"
#include "hextreme/submodel.hpp"

#endif  // HEXTREME_HEXTREME_HPP
