#pragma once

#include "realmono/error.hpp"
#include "realmono/rational.hpp"
#include "realmono/poset.hpp"
#include "realmono/measure.hpp"
#include "realmono/max_flow.hpp"
#include "realmono/simplex.hpp"
#include "realmono/coupling.hpp"
#include "realmono/synchronize.hpp"
#include "realmono/cftp.hpp"
#include "realmono/io.hpp"
#include "realmono/svg.hpp"
