#ifndef VPKI_GATEWAY_CODEC_HPP
#define VPKI_GATEWAY_CODEC_HPP

#include <json.hpp>

#include "vpki/gateway/discovery.hpp"
#include "vpki/ltca/ltca.hpp"
#include "vpki/pca/pca.hpp"
#include "vpki/ra/ra.hpp"

// JSON wire codecs. Byte fields travel as unpadded base64url strings;
// credentials (LTCs, tickets, pseudonyms) travel as their opaque canonical
// encodings, so anything hashed or signed is re-derived from canonical
// bytes and never depends on JSON key order or formatting.
namespace vpki::gateway {

using Json = nlohmann::json;

Json bytes_to_json(ByteView b);
Bytes bytes_from_json(const Json& j);
Json digest_to_json(const Digest& d);
Digest digest_from_json(const Json& j);

Json to_json(const ltca::TicketRequest& v);
ltca::TicketRequest ticket_request_from_json(const Json& j);

Json to_json(const ltca::TicketResponse& v);
ltca::TicketResponse ticket_response_from_json(const Json& j);

Json to_json(const ltca::ForeignTicketRequest& v);
ltca::ForeignTicketRequest foreign_ticket_request_from_json(const Json& j);

Json to_json(const pca::PseudonymRequest& v);
pca::PseudonymRequest pseudonym_request_from_json(const Json& j);

Json to_json(const pca::PseudonymResponse& v);
pca::PseudonymResponse pseudonym_response_from_json(const Json& j);

Json to_json(const pca::ResolveRequest& v);
pca::ResolveRequest resolve_request_from_json(const Json& j);

Json to_json(const pca::Resolution& v);
pca::Resolution resolution_from_json(const Json& j);

Json to_json(const ra::ReportEnvelope& v);
ra::ReportEnvelope report_envelope_from_json(const Json& j);

Json to_json(const ra::ValidationReport& v);
ra::ValidationReport validation_report_from_json(const Json& j);

Json to_json(const DomainDescriptor& v);
DomainDescriptor domain_descriptor_from_json(const Json& j);

// Uniform response envelope: {"ok":true,"value":...} on success,
// {"ok":false,"error":"<name>","detail":"..."} on denial.
Json envelope_ok(Json value);
Json envelope_err(const Error& e);

// Unwraps an envelope; `decode` converts the inner value.
template <typename T, typename Fn>
Outcome<T> unwrap(const Json& j, Fn decode) {
    try {
        if (!j.at("ok").get<bool>()) {
            return Error{err_from_name(j.at("error").get<std::string>()),
                         j.value("detail", "")};
        }
        return decode(j.at("value"));
    } catch (const std::exception& e) {
        return Error{Err::BadRequest,
                     std::string("malformed envelope: ") + e.what()};
    }
}

}  // namespace vpki::gateway

#endif
