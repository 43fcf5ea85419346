#pragma once

#include "cfgraph/cnf.hpp"
#include "cfgraph/correspondence.hpp"
#include "cfgraph/diagram.hpp"
#include "cfgraph/enumerate.hpp"
#include "cfgraph/error.hpp"
#include "cfgraph/grammar.hpp"
#include "cfgraph/label.hpp"
#include "cfgraph/walks.hpp"
