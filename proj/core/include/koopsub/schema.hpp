#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace koopsub::schema {

// The published experiment config schema (configs/config.schema.json).
std::string_view config_schema();

// Validates a JSON document against a JSON Schema restricted to the keywords
// type, enum, const, local $ref, properties, required, additionalProperties, items,
// minItems, maxItems, minimum, maximum, exclusiveMinimum, exclusiveMaximum,
// minLength and anyOf. Returns one message per violation, each prefixed with
// the JSON pointer of the offending value; empty when valid. Malformed JSON
// yields a single message.
std::vector<std::string> validate(std::string_view instance, std::string_view schema);

}  // namespace koopsub::schema
