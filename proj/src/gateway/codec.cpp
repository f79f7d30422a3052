#include "vpki/gateway/codec.hpp"

namespace vpki::gateway {

Json bytes_to_json(ByteView b) { return base64url_encode(b); }

Bytes bytes_from_json(const Json& j) {
    return base64url_decode(j.get<std::string>());
}

Json digest_to_json(const Digest& d) { return base64url_encode(d); }

Digest digest_from_json(const Json& j) {
    Bytes b = bytes_from_json(j);
    if (b.size() != 32) throw std::runtime_error("digest must be 32 bytes");
    Digest d;
    std::copy(b.begin(), b.end(), d.begin());
    return d;
}

Json to_json(const ltca::TicketRequest& v) {
    return Json{{"id_req", v.id_req},
                {"target_hash", digest_to_json(v.target_hash)},
                {"t_s", v.t_s},
                {"t_e", v.t_e},
                {"nonce", v.nonce},
                {"t_now", v.t_now},
                {"ltc", bytes_to_json(v.ltc.to_bytes())},
                {"signature", bytes_to_json(v.signature)}};
}

ltca::TicketRequest ticket_request_from_json(const Json& j) {
    ltca::TicketRequest v;
    v.id_req = j.at("id_req").get<std::string>();
    v.target_hash = digest_from_json(j.at("target_hash"));
    v.t_s = j.at("t_s").get<uint64_t>();
    v.t_e = j.at("t_e").get<uint64_t>();
    v.nonce = j.at("nonce").get<uint64_t>();
    v.t_now = j.at("t_now").get<uint64_t>();
    v.ltc = LongTermCertificate::from_bytes(bytes_from_json(j.at("ltc")));
    v.signature = bytes_from_json(j.at("signature"));
    return v;
}

Json to_json(const ltca::TicketResponse& v) {
    return Json{{"id_res", v.id_res},
                {"ticket", bytes_to_json(v.ticket.to_bytes())},
                {"rnd_ik_tkt", bytes_to_json(v.rnd_ik_tkt)},
                {"nonce", v.nonce},
                {"t_now", v.t_now}};
}

ltca::TicketResponse ticket_response_from_json(const Json& j) {
    ltca::TicketResponse v;
    v.id_res = j.at("id_res").get<std::string>();
    v.ticket = Ticket::from_bytes(bytes_from_json(j.at("ticket")));
    v.rnd_ik_tkt = bytes_from_json(j.at("rnd_ik_tkt"));
    v.nonce = j.at("nonce").get<uint64_t>();
    v.t_now = j.at("t_now").get<uint64_t>();
    return v;
}

Json to_json(const ltca::ForeignTicketRequest& v) {
    return Json{{"id_req", v.id_req},
                {"home_issuer_id", v.home_issuer_id},
                {"presented_ticket", bytes_to_json(v.presented_ticket)},
                {"rnd_presented", bytes_to_json(v.rnd_presented)},
                {"target_hash", digest_to_json(v.target_hash)},
                {"t_s", v.t_s},
                {"t_e", v.t_e},
                {"nonce", v.nonce},
                {"t_now", v.t_now}};
}

ltca::ForeignTicketRequest foreign_ticket_request_from_json(const Json& j) {
    ltca::ForeignTicketRequest v;
    v.id_req = j.at("id_req").get<std::string>();
    v.home_issuer_id = j.at("home_issuer_id").get<std::string>();
    v.presented_ticket = bytes_from_json(j.at("presented_ticket"));
    v.rnd_presented = bytes_from_json(j.at("rnd_presented"));
    v.target_hash = digest_from_json(j.at("target_hash"));
    v.t_s = j.at("t_s").get<uint64_t>();
    v.t_e = j.at("t_e").get<uint64_t>();
    v.nonce = j.at("nonce").get<uint64_t>();
    v.t_now = j.at("t_now").get<uint64_t>();
    return v;
}

Json to_json(const pca::PseudonymRequest& v) {
    Json csrs = Json::array();
    for (const auto& c : v.csrs) {
        csrs.push_back(Json{{"public_key", bytes_to_json(c.public_key)},
                            {"signature", bytes_to_json(c.signature)}});
    }
    return Json{{"id_req", v.id_req},
                {"rnd_n_tkt", bytes_to_json(v.rnd_n_tkt)},
                {"ticket", bytes_to_json(v.ticket_bytes)},
                {"csrs", std::move(csrs)},
                {"nonce", v.nonce},
                {"t_now", v.t_now}};
}

pca::PseudonymRequest pseudonym_request_from_json(const Json& j) {
    pca::PseudonymRequest v;
    v.id_req = j.at("id_req").get<std::string>();
    v.rnd_n_tkt = bytes_from_json(j.at("rnd_n_tkt"));
    v.ticket_bytes = bytes_from_json(j.at("ticket"));
    for (const auto& c : j.at("csrs")) {
        pca::Csr csr;
        csr.public_key = bytes_from_json(c.at("public_key"));
        csr.signature = bytes_from_json(c.at("signature"));
        v.csrs.push_back(std::move(csr));
    }
    v.nonce = j.at("nonce").get<uint64_t>();
    v.t_now = j.at("t_now").get<uint64_t>();
    return v;
}

Json to_json(const pca::PseudonymResponse& v) {
    Json ps = Json::array();
    for (const auto& p : v.pseudonyms) ps.push_back(bytes_to_json(p.to_bytes()));
    return Json{{"id_res", v.id_res},
                {"pseudonyms", std::move(ps)},
                {"rnd_v", bytes_to_json(v.rnd_v)},
                {"nonce", v.nonce},
                {"t_now", v.t_now}};
}

pca::PseudonymResponse pseudonym_response_from_json(const Json& j) {
    pca::PseudonymResponse v;
    v.id_res = j.at("id_res").get<std::string>();
    for (const auto& p : j.at("pseudonyms")) {
        v.pseudonyms.push_back(Pseudonym::from_bytes(bytes_from_json(p)));
    }
    v.rnd_v = bytes_from_json(j.at("rnd_v"));
    v.nonce = j.at("nonce").get<uint64_t>();
    v.t_now = j.at("t_now").get<uint64_t>();
    return v;
}

Json to_json(const pca::ResolveRequest& v) {
    return Json{{"serial", digest_to_json(v.serial)},
                {"signature", bytes_to_json(v.signature)}};
}

pca::ResolveRequest resolve_request_from_json(const Json& j) {
    pca::ResolveRequest v;
    v.serial = digest_from_json(j.at("serial"));
    v.signature = bytes_from_json(j.at("signature"));
    return v;
}

Json to_json(const pca::Resolution& v) {
    return Json{{"serial", digest_to_json(v.serial)},
                {"ticket", bytes_to_json(v.ticket_bytes)},
                {"rnd_ik_p", digest_to_json(v.rnd_ik_p)},
                {"signature", bytes_to_json(v.signature)}};
}

pca::Resolution resolution_from_json(const Json& j) {
    pca::Resolution v;
    v.serial = digest_from_json(j.at("serial"));
    v.ticket_bytes = bytes_from_json(j.at("ticket"));
    v.rnd_ik_p = digest_from_json(j.at("rnd_ik_p"));
    v.signature = bytes_from_json(j.at("signature"));
    return v;
}

Json to_json(const ra::ReportEnvelope& v) {
    return Json{
        {"suspicious_pseudonym", bytes_to_json(v.suspicious_pseudonym)},
        {"reporter_pseudonym", bytes_to_json(v.reporter_pseudonym)},
        {"signature", bytes_to_json(v.signature)}};
}

ra::ReportEnvelope report_envelope_from_json(const Json& j) {
    ra::ReportEnvelope v;
    v.suspicious_pseudonym = bytes_from_json(j.at("suspicious_pseudonym"));
    v.reporter_pseudonym = bytes_from_json(j.at("reporter_pseudonym"));
    v.signature = bytes_from_json(j.at("signature"));
    return v;
}

Json to_json(const ra::ValidationReport& v) {
    return Json{{"pseudonym_serial", digest_to_json(v.pseudonym_serial)},
                {"verdict", v.verdict == ra::Verdict::ValidIssuance
                                ? "ValidIssuance"
                                : "InvalidIssuance"},
                {"stage", v.stage},
                {"ticket_serial", bytes_to_json(v.ticket_serial)},
                {"pca_id", v.pca_id},
                {"claimed_ik", digest_to_json(v.claimed_ik)},
                {"recomputed_ik", digest_to_json(v.recomputed_ik)}};
}

ra::ValidationReport validation_report_from_json(const Json& j) {
    ra::ValidationReport v;
    v.pseudonym_serial = digest_from_json(j.at("pseudonym_serial"));
    v.verdict = j.at("verdict").get<std::string>() == "ValidIssuance"
                    ? ra::Verdict::ValidIssuance
                    : ra::Verdict::InvalidIssuance;
    v.stage = j.at("stage").get<std::string>();
    v.ticket_serial = bytes_from_json(j.at("ticket_serial"));
    v.pca_id = j.at("pca_id").get<std::string>();
    v.claimed_ik = digest_from_json(j.at("claimed_ik"));
    v.recomputed_ik = digest_from_json(j.at("recomputed_ik"));
    return v;
}

Json to_json(const DomainDescriptor& v) {
    Json pcas = Json::array();
    for (const auto& p : v.pcas) {
        pcas.push_back(
            Json{{"id", p.id},
                 {"endpoint", p.endpoint},
                 {"certificate", bytes_to_json(p.certificate.to_bytes())},
                 {"tau_p", p.tau_p},
                 {"gamma", p.gamma}});
    }
    return Json{
        {"id", v.id},
        {"ltca_id", v.ltca_id},
        {"ltca_endpoint", v.ltca_endpoint},
        {"ltca_certificate", bytes_to_json(v.ltca_certificate.to_bytes())},
        {"pcas", std::move(pcas)},
        {"epoch", v.epoch}};
}

DomainDescriptor domain_descriptor_from_json(const Json& j) {
    DomainDescriptor v;
    v.id = j.at("id").get<std::string>();
    v.ltca_id = j.at("ltca_id").get<std::string>();
    v.ltca_endpoint = j.at("ltca_endpoint").get<std::string>();
    v.ltca_certificate = LongTermCertificate::from_bytes(
        bytes_from_json(j.at("ltca_certificate")));
    for (const auto& p : j.at("pcas")) {
        PcaDescriptor d;
        d.id = p.at("id").get<std::string>();
        d.endpoint = p.at("endpoint").get<std::string>();
        d.certificate = LongTermCertificate::from_bytes(
            bytes_from_json(p.at("certificate")));
        d.tau_p = p.at("tau_p").get<uint64_t>();
        d.gamma = p.at("gamma").get<uint64_t>();
        v.pcas.push_back(std::move(d));
    }
    v.epoch = j.at("epoch").get<uint64_t>();
    return v;
}

Json envelope_ok(Json value) {
    return Json{{"ok", true}, {"value", std::move(value)}};
}

Json envelope_err(const Error& e) {
    return Json{{"ok", false}, {"error", err_name(e.code)},
                {"detail", e.detail}};
}

}  // namespace vpki::gateway
