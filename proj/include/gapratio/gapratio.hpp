#pragma once

#include "gapratio/distance.hpp"
#include "gapratio/distributions.hpp"
#include "gapratio/ensembles.hpp"
#include "gapratio/error.hpp"
#include "gapratio/fit.hpp"
#include "gapratio/goodness.hpp"
#include "gapratio/ingest.hpp"
#include "gapratio/levels.hpp"
#include "gapratio/ratios.hpp"
#include "gapratio/specfn.hpp"
