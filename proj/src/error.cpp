#include "creditnet/error.hpp"

namespace creditnet {

std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::parse: return "ParseError";
    case ErrorKind::invariant_violation: return "InvariantViolation";
    case ErrorKind::empty_snapshot: return "EmptySnapshot";
    case ErrorKind::config: return "ConfigError";
    case ErrorKind::not_incident: return "NotIncident";
    case ErrorKind::no_path: return "NoPath";
    case ErrorKind::limit_breach: return "LimitBreach";
    case ErrorKind::source_cap_exceeded: return "SourceCapExceeded";
    case ErrorKind::insufficient_xrp: return "InsufficientXrp";
    case ErrorKind::invalid_amount: return "InvalidAmount";
    case ErrorKind::disconnected: return "Disconnected";
    case ErrorKind::convergence_failure: return "ConvergenceFailure";
    case ErrorKind::empty_result: return "EmptyResult";
    case ErrorKind::missing_rate: return "MissingRate";
    case ErrorKind::mixed_currency: return "MixedCurrency";
    case ErrorKind::node_missing: return "NodeMissing";
    case ErrorKind::not_enough_pairs: return "NotEnoughPairs";
    case ErrorKind::missing_tx_log: return "MissingTxLog";
    case ErrorKind::unknown_wallet: return "UnknownWallet";
    case ErrorKind::not_a_gateway: return "NotAGateway";
    case ErrorKind::empty_window: return "EmptyWindow";
    case ErrorKind::not_cross_currency: return "NotCrossCurrency";
    case ErrorKind::io: return "IoError";
    }
    return "Error";
}

}  // namespace creditnet
