#pragma once

#include "hopqg/augment.hpp"
#include "hopqg/chain_planner.hpp"
#include "hopqg/config.hpp"
#include "hopqg/context.hpp"
#include "hopqg/context_graph.hpp"
#include "hopqg/dataset_builder.hpp"
#include "hopqg/error.hpp"
#include "hopqg/evaluation.hpp"
#include "hopqg/filter.hpp"
#include "hopqg/generation.hpp"
#include "hopqg/generator_input.hpp"
#include "hopqg/hotpot.hpp"
#include "hopqg/http_client.hpp"
#include "hopqg/jsonl.hpp"
#include "hopqg/manifest.hpp"
#include "hopqg/metrics.hpp"
#include "hopqg/pipeline.hpp"
#include "hopqg/probe.hpp"
#include "hopqg/squad.hpp"
#include "hopqg/templates.hpp"
#include "hopqg/text.hpp"
#include "hopqg/worker_pool.hpp"
