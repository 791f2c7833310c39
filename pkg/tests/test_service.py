from fastapi.testclient import TestClient

from votechain.service import create_app
from conftest import Stack

PD = {"id_number": "card-x-1", "first_name": "given-x", "last_name": "family-x", "phone": "6912000001"}


def make_client(stack, ttl=1800, dev=False):
    app = create_app(stack.contract, stack.accounts, stack.clock, session_ttl=ttl, expose_dev_inbox=dev)
    return TestClient(app)


def login(client, account):
    r = client.post("/session", json={"address": account.address.hex, "password": account.password})
    assert r.status_code == 200
    return {"Authorization": "Bearer " + r.json()["token"]}


def bootstrap(stack, client, names=("Alice", "Bob")):
    """Init + advance to Voting with one registered voter, all over HTTP."""
    auth = login(client, stack.authority)
    r = client.post(
        "/authority/init",
        json={"trusted": [stack.authority.address.hex], "candidates": [{"name": n} for n in names]},
        headers=auth,
    )
    assert r.status_code == 200
    assert client.post("/authority/phase/advance", headers=auth).json()["phase"] == "registration"
    r = client.post("/authority/register", json={"personal_data": PD}, headers=auth)
    assert r.status_code == 200
    voter = r.json()
    assert client.post("/authority/phase/advance", headers=auth).json()["phase"] == "voting"
    return auth, voter


def voter_session(client, voter):
    r = client.post("/session", json={"address": voter["voter"], "password": voter["password"]})
    assert r.status_code == 200
    return {"Authorization": "Bearer " + r.json()["token"]}


# --- sessions ---

def test_login_rejects_wrong_password(stack):
    client = make_client(stack)
    r = client.post("/session", json={"address": stack.authority.address.hex, "password": "nope"})
    assert r.status_code == 401
    assert r.json()["error"] == "LoginFailed"


def test_login_rejects_malformed_address(stack):
    client = make_client(stack)
    r = client.post("/session", json={"address": "not-an-address", "password": "x"})
    assert (r.status_code, r.json()["error"]) == (400, "MalformedBody")


def test_missing_and_garbage_tokens(stack):
    client = make_client(stack)
    assert client.post("/authority/phase/advance").status_code == 401
    r = client.post("/authority/phase/advance", headers={"Authorization": "Bearer bogus"})
    assert (r.status_code, r.json()["error"]) == (401, "BadSession")
    r = client.get("/results", headers={"Authorization": "Basic xyz"})
    assert r.status_code == 401


def test_session_expires(stack):
    client = make_client(stack, ttl=600)
    headers = login(client, stack.authority)
    stack.clock.advance(601)
    r = client.post("/authority/phase/advance", headers=headers)
    assert (r.status_code, r.json()["error"]) == (401, "BadSession")


def test_session_expiry_slides_on_use(stack):
    stack.init()
    client = make_client(stack, ttl=600)
    headers = login(client, stack.authority)
    for _ in range(3):
        stack.clock.advance(500)  # each under the ttl, total far over it
        assert client.post("/authority/phase/advance", headers=headers).status_code in (200, 409)


# --- endpoint behavior and error mapping ---

def test_full_voter_flow(stack):
    client = make_client(stack, dev=True)
    auth, voter = bootstrap(stack, client)
    vheaders = voter_session(client, voter)

    r = client.post("/voter/authenticate", json={"personal_data": PD}, headers=vheaders)
    assert r.status_code == 200 and r.json()["status"] == "otp_issued"
    code = client.get(f"/dev/inbox/{voter['voter']}").json()["last"]

    r = client.post("/voter/vote", json={"candidate_id": 1, "otp_code": code}, headers=vheaders)
    assert r.status_code == 200
    tx_hash = r.json()["tx_hash"]

    r = client.get(f"/receipt/{tx_hash}")
    assert r.status_code == 200
    assert r.json()["sender"] == voter["voter"]
    assert r.json()["candidate_id"] == 1

    assert client.post("/authority/phase/advance", headers=auth).json()["phase"] == "closed"
    r = client.get("/results")
    assert r.json()["total_votes"] == 1
    assert r.json()["counts"][0]["votes"] == 1


def test_error_statuses(stack):
    client = make_client(stack)
    headers = login(client, stack.authority)

    # uninitialized contract
    r = client.post("/authority/phase/advance", headers=headers)
    assert (r.status_code, r.json()["error"]) == (422, "NotInitialized")
    # registration outside its phase
    init = {"trusted": [stack.authority.address.hex], "candidates": [{"name": "A"}]}
    assert client.post("/authority/init", json=init, headers=headers).status_code == 200
    r = client.post("/authority/register", json={"personal_data": PD}, headers=headers)
    assert (r.status_code, r.json()["error"]) == (422, "WrongPhase")
    # double init
    r = client.post("/authority/init", json=init, headers=headers)
    assert (r.status_code, r.json()["error"]) == (409, "AlreadyInitialized")
    # anonymous results before close
    r = client.get("/results")
    assert (r.status_code, r.json()["error"]) == (403, "Unauthorized")
    # untrusted session initializing a different trusted set
    outsider = stack.accounts.create_account()
    oheaders = login(client, outsider)
    r = client.post("/authority/phase/advance", headers=oheaders)
    assert (r.status_code, r.json()["error"]) == (403, "Unauthorized")


def test_vote_error_statuses(stack):
    client = make_client(stack, dev=True)
    _, voter = bootstrap(stack, client)
    vheaders = voter_session(client, voter)

    r = client.post("/voter/vote", json={"candidate_id": 1, "otp_code": "123456"}, headers=vheaders)
    assert (r.status_code, r.json()["error"]) == (409, "NoOtpIssued")

    bad = dict(PD, first_name="Mallory")
    r = client.post("/voter/authenticate", json={"personal_data": bad}, headers=vheaders)
    assert (r.status_code, r.json()["error"]) == (403, "AuthFailed")

    client.post("/voter/authenticate", json={"personal_data": PD}, headers=vheaders)
    code = client.get(f"/dev/inbox/{voter['voter']}").json()["last"]

    wrong = "000000" if code != "000000" else "000001"
    r = client.post("/voter/vote", json={"candidate_id": 1, "otp_code": wrong}, headers=vheaders)
    assert (r.status_code, r.json()["error"]) == (403, "OtpInvalid")

    r = client.post("/voter/vote", json={"candidate_id": 9, "otp_code": code}, headers=vheaders)
    assert (r.status_code, r.json()["error"]) == (422, "UnknownCandidate")

    stack.clock.advance(400)  # past the code window, inside the session ttl
    r = client.post("/voter/vote", json={"candidate_id": 1, "otp_code": code}, headers=vheaders)
    assert (r.status_code, r.json()["error"]) == (410, "OtpExpired")


def test_receipt_and_chain_endpoints(stack):
    client = make_client(stack)
    headers = login(client, stack.authority)
    init = {"trusted": [stack.authority.address.hex], "candidates": [{"name": "A"}]}
    init_hash = client.post("/authority/init", json=init, headers=headers).json()["tx_hash"]

    r = client.get(f"/receipt/{init_hash}")
    assert (r.status_code, r.json()["error"]) == (404, "NotAVote")
    r = client.get("/receipt/" + "ab" * 32)
    assert (r.status_code, r.json()["error"]) == (404, "NotFound")
    r = client.get("/receipt/zz")
    assert (r.status_code, r.json()["error"]) == (400, "MalformedBody")

    assert client.get("/chain/block/0").status_code == 401
    block = client.get("/chain/block/0", headers=headers).json()
    assert block["index"] == 0
    assert block["prev_hash"] == "0x" + "00" * 32
    assert block["tx_hashes"] == []
    r = client.get("/chain/block/99", headers=headers)
    assert (r.status_code, r.json()["error"]) == (404, "OutOfRange")

    verdict = client.get("/chain/verify").json()
    assert verdict == {"valid": True, "first_bad_index": None, "reason": None}


def test_validation_errors_are_400(stack):
    client = make_client(stack)
    headers = login(client, stack.authority)
    r = client.post("/authority/init", json={"trusted": []}, headers=headers)
    assert (r.status_code, r.json()["error"]) == (400, "MalformedBody")
    r = client.post("/voter/vote", json={"candidate_id": "x"}, headers=headers)
    assert r.status_code == 400


def test_dev_inbox_gated_off_by_default(stack):
    client = make_client(stack, dev=False)
    r = client.get("/dev/inbox/" + stack.authority.address.hex)
    assert r.status_code == 404


def test_register_with_caller_supplied_address(stack):
    client = make_client(stack)
    headers = login(client, stack.authority)
    init = {"trusted": [stack.authority.address.hex], "candidates": [{"name": "A"}]}
    client.post("/authority/init", json=init, headers=headers)
    client.post("/authority/phase/advance", headers=headers)
    account = stack.accounts.create_account()
    r = client.post(
        "/authority/register",
        json={"personal_data": PD, "voter": account.address.hex},
        headers=headers,
    )
    assert r.status_code == 200
    body = r.json()
    assert body["voter"] == account.address.hex
    assert "password" not in body


# --- facade equivalence: HTTP and direct calls produce the same chain ---

def test_http_and_direct_calls_build_identical_chains():
    http_stack, direct_stack = Stack(seed=1212), Stack(seed=1212)
    client = make_client(http_stack, dev=True)
    headers = login(client, http_stack.authority)

    # HTTP side
    init = {"trusted": [http_stack.authority.address.hex], "candidates": [{"name": "A"}, {"name": "B"}]}
    client.post("/authority/init", json=init, headers=headers)
    client.post("/authority/phase/advance", headers=headers)
    voter = client.post("/authority/register", json={"personal_data": PD}, headers=headers).json()
    client.post("/authority/phase/advance", headers=headers)
    http_stack.clock.advance(30)
    vheaders = voter_session(client, voter)
    client.post("/voter/authenticate", json={"personal_data": PD}, headers=vheaders)
    code = client.get(f"/dev/inbox/{voter['voter']}").json()["last"]
    client.post("/voter/vote", json={"candidate_id": 2, "otp_code": "999999" if code != "999999" else "999998"}, headers=vheaders)
    client.post("/voter/vote", json={"candidate_id": 2, "otp_code": code}, headers=vheaders)
    client.post("/authority/phase/advance", headers=headers)

    # same operations, called directly
    from votechain.contract import ElectionConfig
    from votechain.errors import VoteChainError
    from votechain.identity import PersonalData

    s = direct_stack
    a = s.authority.address
    s.contract.init_election(a, ElectionConfig.from_names([a], ["A", "B"]))
    s.contract.advance_phase(a)
    account = s.accounts.create_account()
    data = PersonalData(**PD)
    s.contract.register_citizen(a, account.address, data)
    s.contract.advance_phase(a)
    s.clock.advance(30)
    s.contract.authenticate(account.address, data)
    dcode = s.transport.last_code(account.address)
    try:
        s.contract.cast_vote(account.address, 2, "999999" if dcode != "999999" else "999998")
    except VoteChainError:
        pass
    s.contract.cast_vote(account.address, 2, dcode)
    s.contract.advance_phase(a)

    assert http_stack.ledger.serialize() == direct_stack.ledger.serialize()
    assert http_stack.contract.state_digest() == direct_stack.contract.state_digest()
