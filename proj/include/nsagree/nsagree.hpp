#pragma once

#include "nsagree/rational.hpp"
#include "nsagree/box.hpp"
#include "nsagree/epistemic.hpp"
#include "nsagree/families.hpp"
#include "nsagree/linear.hpp"
#include "nsagree/classical.hpp"
#include "nsagree/bridge.hpp"
#include "nsagree/classifier.hpp"
#include "nsagree/reduction.hpp"
#include "nsagree/json_io.hpp"
