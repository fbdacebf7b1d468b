#ifndef AMGR_SA_AMGR_SA_HPP
#define AMGR_SA_AMGR_SA_HPP

#include "errors.hpp"
#include "sparse.hpp"
#include "dense.hpp"
#include "matrix_market.hpp"
#include "problems.hpp"
#include "mesh.hpp"
#include "splitting.hpp"
#include "greedy.hpp"
#include "by_hand.hpp"
#include "brute_force.hpp"
#include "subdomains.hpp"
#include "anneal.hpp"
#include "amgr.hpp"
#include "metrics.hpp"
#include "io.hpp"

#endif
