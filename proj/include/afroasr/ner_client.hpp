#pragma once

// Client for a remote NER service.
//
//   POST <endpoint path, default /ner>
//   request:  {"texts":[{"id":...,"text":...}]}
//   response: {"results":[{"id":...,"spans":[{label,start,end,score}]}]}
//
// Texts are sent normalized with textnorm defaults; returned token indices
// refer to that tokenization.

#include <chrono>
#include <string>
#include <string_view>

#include "afroasr/corpus.hpp"
#include "afroasr/entities.hpp"

namespace afroasr::entities {

struct NerClientOptions {
  std::size_t batch_size = 16;
  /// Total attempts per batch, counting the first.
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::milliseconds timeout{30000};
  std::size_t max_concurrent_batches = 1;
};

struct Endpoint {
  std::string scheme_host_port;  // e.g. "http://localhost:8080"
  std::string path;              // e.g. "/ner"
};

/// Throws DataError for anything that is not http(s)://host[:port][/path].
Endpoint parse_endpoint(std::string_view url);

SpanMap fetch_ner(std::string_view endpoint, const corpus::Corpus& utterances,
                  const NerClientOptions& opts = {});

}  // namespace afroasr::entities
