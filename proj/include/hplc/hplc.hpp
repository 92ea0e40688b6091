#pragma once

#include "clustering.hpp"
#include "features.hpp"
#include "graph.hpp"
#include "io.hpp"
#include "landmarks.hpp"
#include "linkeval.hpp"
#include "parallel.hpp"
#include "randgraph.hpp"
#include "rng.hpp"
#include "spectral.hpp"
#include "theory.hpp"
