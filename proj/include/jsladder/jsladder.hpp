#pragma once

#include "jsladder/fock.hpp"
#include "jsladder/sparse_operator.hpp"
#include "jsladder/schwinger.hpp"
#include "jsladder/spectral.hpp"
#include "jsladder/jpoly.hpp"
#include "jsladder/ladder_engine.hpp"
#include "jsladder/casimir_ladders.hpp"
#include "jsladder/report.hpp"
#include "jsladder/suite.hpp"
#include "jsladder/artifacts.hpp"
