#include "seqbench/core/error.hpp"

namespace seqbench {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::UnknownToken: return "UnknownToken";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::UnknownProblem: return "UnknownProblem";
    case ErrorCode::InfeasibleConfig: return "InfeasibleConfig";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NumericalError: return "NumericalError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::PayloadTooLarge: return "PayloadTooLarge";
    case ErrorCode::ProtocolError: return "ProtocolError";
    case ErrorCode::ConnectionClosed: return "ConnectionClosed";
    case ErrorCode::ConnectionError: return "ConnectionError";
    case ErrorCode::RemoteError: return "RemoteError";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::MissingGroup: return "MissingGroup";
  }
  return "Unknown";
}

}  // namespace seqbench
