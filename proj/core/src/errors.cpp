#include "uatpc/errors.hpp"

namespace uatpc {

StageError::StageError(std::string stage, const std::string& what)
    : Error("stage '" + stage + "' failed: " + what), stage_(std::move(stage))
{
}

} // namespace uatpc
