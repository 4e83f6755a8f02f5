#pragma once

#include "oblit/citegraph.hpp"
#include "oblit/corpus.hpp"
#include "oblit/csv.hpp"
#include "oblit/detector.hpp"
#include "oblit/error.hpp"
#include "oblit/keyvalue.hpp"
#include "oblit/mention_index.hpp"
#include "oblit/metrics.hpp"
#include "oblit/ngram.hpp"
#include "oblit/parallel.hpp"
#include "oblit/pipeline.hpp"
#include "oblit/rng.hpp"
#include "oblit/synthgen.hpp"
#include "oblit/tabulator.hpp"
#include "oblit/text.hpp"
#include "oblit/topicmodel.hpp"
