#pragma once

#include <json.hpp>

#include "afroasr/entities.hpp"

namespace afroasr::entities::detail {

/// `{label, start, end, score[, source]}`; throws DataError naming the
/// missing or bad field.
EntitySpan span_from_json(const nlohmann::json& obj, SpanSource default_source);

nlohmann::ordered_json span_to_json(const EntitySpan& span);

}  // namespace afroasr::entities::detail
