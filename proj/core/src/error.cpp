#include "tout/error.hpp"

namespace tout {

MissingState::MissingState(unsigned long long id)
    : Error("missing state: id " + std::to_string(id) + " is not in the store"), id_(id) {}

BackendUnavailable::BackendUnavailable(const std::string& what, int last_status)
    : Error(what + " (last status " + std::to_string(last_status) + ")"), last_status_(last_status) {}

ParseError::ParseError(const std::string& what, std::size_t offset)
    : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

}  // namespace tout
