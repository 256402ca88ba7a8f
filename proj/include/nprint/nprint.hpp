#pragma once

#include "nprint/aggregator.hpp"
#include "nprint/config.hpp"
#include "nprint/csv.hpp"
#include "nprint/decoder.hpp"
#include "nprint/encoder.hpp"
#include "nprint/error.hpp"
#include "nprint/filter.hpp"
#include "nprint/hex_dump.hpp"
#include "nprint/layout.hpp"
#include "nprint/live.hpp"
#include "nprint/packet.hpp"
#include "nprint/pcap.hpp"
#include "nprint/pipeline.hpp"
#include "nprint/protocol.hpp"
#include "nprint/source.hpp"
