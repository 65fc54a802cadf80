#pragma once

#include "nullmorph/causal.hpp"
#include "nullmorph/endomorphism.hpp"
#include "nullmorph/errors.hpp"
#include "nullmorph/identities.hpp"
#include "nullmorph/jet.hpp"
#include "nullmorph/null_curve.hpp"
#include "nullmorph/random.hpp"
#include "nullmorph/selfdual.hpp"
#include "nullmorph/spinor.hpp"
#include "nullmorph/twistor.hpp"
#include "nullmorph/io.hpp"
#include "nullmorph/suite.hpp"
