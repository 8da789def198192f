#pragma once

#include "archconf/automaton.hpp"
#include "archconf/config.hpp"
#include "archconf/detector.hpp"
#include "archconf/errors.hpp"
#include "archconf/evaluator.hpp"
#include "archconf/events.hpp"
#include "archconf/interpreter.hpp"
#include "archconf/learner.hpp"
#include "archconf/names.hpp"
#include "archconf/pipeline.hpp"
#include "archconf/render.hpp"
#include "archconf/scenario.hpp"
#include "archconf/static_model.hpp"
