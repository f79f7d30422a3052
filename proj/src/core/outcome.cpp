#include "vpki/core/outcome.hpp"

namespace vpki {

const char* err_name(Err e) {
    switch (e) {
        case Err::StaleTimestamp: return "StaleTimestamp";
        case Err::BadSignature: return "BadSignature";
        case Err::UnknownOrExpiredLtc: return "UnknownOrExpiredLTC";
        case Err::DuplicateRegistration: return "DuplicateRegistration";
        case Err::SybilDenied: return "SybilDenied";
        case Err::GuardUnavailable: return "GuardUnavailable";
        case Err::UntrustedIssuer: return "UntrustedIssuer";
        case Err::ReusedForeignTicket: return "ReusedForeignTicket";
        case Err::UntrustedLtca: return "UntrustedLTCA";
        case Err::TargetMismatch: return "TargetMismatch";
        case Err::ExpiredTicket: return "ExpiredTicket";
        case Err::TicketReused: return "TicketReused";
        case Err::BadCsr: return "BadCSR";
        case Err::BatchTooLarge: return "BatchTooLarge";
        case Err::WindowMisaligned: return "WindowMisaligned";
        case Err::NotFound: return "NotFound";
        case Err::UnauthorizedCaller: return "UnauthorizedCaller";
        case Err::BadReporterSignature: return "BadReporterSignature";
        case Err::UnknownPca: return "UnknownPCA";
        case Err::PcaRefused: return "PCARefused";
        case Err::BadPcaSignature: return "BadPCASignature";
        case Err::BadTicketSignature: return "BadTicketSignature";
        case Err::IkMismatch: return "IkMismatch";
        case Err::RateLimited: return "RateLimited";
        case Err::StoreBackpressure: return "StoreBackpressure";
        case Err::InjectedFailure: return "InjectedFailure";
        case Err::UnknownDomain: return "UnknownDomain";
        case Err::ProviderMisbehavior: return "ProviderMisbehavior";
        case Err::BadRequest: return "BadRequest";
    }
    return "Unknown";
}

Err err_from_name(const std::string& name) {
    static constexpr Err all[] = {
        Err::StaleTimestamp, Err::BadSignature, Err::UnknownOrExpiredLtc,
        Err::DuplicateRegistration, Err::SybilDenied, Err::GuardUnavailable,
        Err::UntrustedIssuer, Err::ReusedForeignTicket, Err::UntrustedLtca,
        Err::TargetMismatch, Err::ExpiredTicket, Err::TicketReused,
        Err::BadCsr, Err::BatchTooLarge, Err::WindowMisaligned, Err::NotFound,
        Err::UnauthorizedCaller, Err::BadReporterSignature, Err::UnknownPca,
        Err::PcaRefused, Err::BadPcaSignature, Err::BadTicketSignature,
        Err::IkMismatch, Err::RateLimited, Err::StoreBackpressure,
        Err::InjectedFailure, Err::UnknownDomain, Err::ProviderMisbehavior,
        Err::BadRequest,
    };
    for (Err e : all) {
        if (name == err_name(e)) return e;
    }
    return Err::BadRequest;
}

}  // namespace vpki
