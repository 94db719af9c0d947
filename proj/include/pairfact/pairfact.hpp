#ifndef PAIRFACT_PAIRFACT_HPP
#define PAIRFACT_PAIRFACT_HPP

#include "pairfact/axioms.hpp"
#include "pairfact/baselines.hpp"
#include "pairfact/common.hpp"
#include "pairfact/eval.hpp"
#include "pairfact/fit.hpp"
#include "pairfact/link.hpp"
#include "pairfact/minimize.hpp"
#include "pairfact/model.hpp"
#include "pairfact/model_io.hpp"
#include "pairfact/parallel.hpp"
#include "pairfact/rng.hpp"
#include "pairfact/schema.hpp"
#include "pairfact/synth.hpp"

#endif  // PAIRFACT_PAIRFACT_HPP
