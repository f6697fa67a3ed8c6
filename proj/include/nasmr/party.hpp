#pragma once

#include <memory>
#include <string>

#include "nasmr/simnet.hpp"

namespace nasmr {

// Builds the per-party state machine for the scenario's protocol-under-test:
// rbc | aba | acs | gc | bla | smr | wba.
std::unique_ptr<IParty> make_party(const std::string& protocol, const PartyEnv& env);
PartyFactory party_factory(const std::string& protocol);
bool protocol_known(const std::string& protocol);

// Default per-party input payload when the scenario omits one.
Bytes default_input_payload(PartyId p);

}  // namespace nasmr
