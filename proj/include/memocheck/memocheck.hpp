#pragma once

#include "memocheck/assertions.hpp"
#include "memocheck/automata.hpp"
#include "memocheck/cache.hpp"
#include "memocheck/checker.hpp"
#include "memocheck/engine.hpp"
#include "memocheck/errors.hpp"
#include "memocheck/parser.hpp"
#include "memocheck/program.hpp"
#include "memocheck/store.hpp"
#include "memocheck/transform.hpp"
