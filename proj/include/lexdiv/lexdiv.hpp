#pragma once
#include "accum.hpp"
#include "corpus.hpp"
#include "entropy.hpp"
#include "errors.hpp"
#include "lawfit.hpp"
#include "nsb.hpp"
#include "relfit.hpp"
#include "rng.hpp"
#include "sampler.hpp"
#include "stats.hpp"
#include "synth.hpp"
#include "tokenizer.hpp"
#include "unicode.hpp"
