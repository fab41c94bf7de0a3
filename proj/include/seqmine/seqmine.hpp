#pragma once

#include "core.hpp"
#include "dataset.hpp"
#include "format.hpp"
#include "itemset_miner.hpp"
#include "oracle.hpp"
#include "parallel.hpp"
#include "plot.hpp"
#include "sequence_miner.hpp"
#include "stream_miner.hpp"
#include "synthetic.hpp"
