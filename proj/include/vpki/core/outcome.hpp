#ifndef VPKI_CORE_OUTCOME_HPP
#define VPKI_CORE_OUTCOME_HPP

#include <stdexcept>
#include <string>
#include <variant>

namespace vpki {

// Protocol-level denial and failure reasons. These are expected outcomes of
// the issuance and validation flows, not programming errors, so they travel
// as values rather than exceptions.
enum class Err {
    StaleTimestamp,
    BadSignature,
    UnknownOrExpiredLtc,
    DuplicateRegistration,
    SybilDenied,
    GuardUnavailable,
    UntrustedIssuer,
    ReusedForeignTicket,
    UntrustedLtca,
    TargetMismatch,
    ExpiredTicket,
    TicketReused,
    BadCsr,
    BatchTooLarge,
    WindowMisaligned,
    NotFound,
    UnauthorizedCaller,
    BadReporterSignature,
    UnknownPca,
    PcaRefused,
    BadPcaSignature,
    BadTicketSignature,
    IkMismatch,
    RateLimited,
    StoreBackpressure,
    InjectedFailure,
    UnknownDomain,
    ProviderMisbehavior,
    BadRequest,
};

const char* err_name(Err e);

// Inverse of err_name; unrecognized names map to Err::BadRequest.
Err err_from_name(const std::string& name);

struct Error {
    Err code;
    std::string detail;
};

template <typename T>
class Outcome {
public:
    Outcome(T value) : v_(std::move(value)) {}
    Outcome(Error e) : v_(std::move(e)) {}
    Outcome(Err code, std::string detail = {})
        : v_(Error{code, std::move(detail)}) {}

    bool ok() const { return std::holds_alternative<T>(v_); }
    explicit operator bool() const { return ok(); }

    T& value() { return std::get<T>(v_); }
    const T& value() const { return std::get<T>(v_); }
    const Error& error() const { return std::get<Error>(v_); }
    Err code() const { return error().code; }

private:
    std::variant<T, Error> v_;
};

// Backend outage of the Sybil guard; callers translate it according to the
// configured fail-open/fail-close policy.
class GuardUnavailableError : public std::runtime_error {
public:
    explicit GuardUnavailableError(const std::string& msg)
        : std::runtime_error(msg) {}
};

}  // namespace vpki

#endif
