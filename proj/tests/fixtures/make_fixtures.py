#!/usr/bin/env python3
"""Regenerates the hand-built fixture corpora used by the test suites.

    python3 tests/fixtures/make_fixtures.py

Outputs (committed, deterministic):
  abcd/abcd_fixture.json      ABCD-style {"train","dev","test"} conversations
  abcd/utterances.json        table for integer candidate ids
  abcd_lenient.json           one conversation with tolerated defects
  multiwoz/{train,dev,test}/dialogues_001.json
"""

import json
import os

HERE = os.path.dirname(os.path.abspath(__file__))

GREETING = "hello how can I help you today?"
ANYTHING_ELSE = "is there anything else I can help you with?"
GOODBYE = "thank you for contacting us, have a nice day"

# Shared utterance table. Conversations in the dev split refer to these by id.
UTTERANCES = [
    GREETING,
    ANYTHING_ELSE,
    GOODBYE,
    "could I get your full name or account id?",
    "I can help with that, one moment please",
    "sorry to hear that, let me look into it",
    "can I have your username, email address and order id?",
    "let me check our faq for that",
    "what is the membership level on the account?",
    "I have applied a promo code to your account",
]

CUSTOMERS = [
    ("Albert sanders", "asanders462", "asanders462@email.com", "4268073561"),
    ("joseph banter", "josephbanter975", "josephbanter975@gmail.com", "0626252373"),
    ("Crystal minh", "cminh730", "cminh730@email.com", "3718624711"),
    ("Rodriguez domingo", "rdomingo1", "rdomingo1@email.com", "5521079922"),
    ("Sanya afzal", "safzal66", "safzal66@email.com", "8816350201"),
    ("David williams", "dwilliams408", "dwilliams408@email.com", "0193845562"),
    ("Norman bouchard", "nbouchard222", "nbouchard222@email.com", "6672019384"),
    ("Alessandro phoenix", "aphoenix7", "aphoenix7@email.com", "2304958817"),
]

# (agent prompt, customer reply, action text) per action name.
STEP_TEXT = {
    "pull-up-account": ("could I get your full name or account id?", "sure it is {name}", "Account has been pulled up for {name}."),
    "verify-identity": ("can I have your username, email address and order id?", "{user} {email} {order}", "Identity verification in progress ..."),
    "validate-purchase": ("can I have your username, email address and order id?", "{user} {email} {order}", "Purchase validation in progress ..."),
    "search-faq": ("let me check our faq for that", "ok thanks", "Searching the FAQ pages ..."),
    "select-faq": ("I found the right faq topic", "great", "System Action: select topic in faq"),
    "membership": ("what is the membership level on the account?", "it is {level}", "Membership level of {level} has been noted."),
    "promo-code": ("I have applied a promo code to your account", "thank you so much", "A promo code has been created."),
    "offer-refund": ("I can offer you a refund", "yes please refund me", "A refund has been made for the amount of {amount}."),
    "search-shirt": ("let me search for shirts", "the blue one please", "System Action: search shirt"),
    "search-jacket": ("let me search for jackets", "the leather jacket", "System Action: search jacket"),
    "search-jeans": ("let me search for jeans", "slim fit please", "System Action: search jeans"),
    "search-boots": ("let me search for boots", "size ten", "System Action: search boots"),
    "update-order": ("what would you like to change on the order?", "change it to {change}", "Order has been updated with {change}."),
    "shipping-status": ("let me check the shipping status", "ok", "Shipping status is now {status}."),
    "enter-details": ("I will enter the details now", "sounds good", "Details of {detail} have been entered."),
    "make-password": ("I will create a new password for you", "thanks", "A password has been generated."),
    "notify-team": ("I will notify the team", "please do", "The website team has been notified."),
    "record-reason": ("what is the reason for the return?", "{reason}", "A reason of {reason} has been recorded."),
    "log-out-in": ("could you log out and log back in?", "done", "Instructions for logging out then in have been sent."),
    "try-again": ("could you try again please?", "it works now", "Instructions to try again have been sent."),
    "send-link": ("I will send you a link", "got it", "A link will be sent."),
    "search-pricing": ("let me check the pricing", "ok", "System Action: search pricing"),
    "subscription-status": ("let me check your subscription", "sure", "Querying the system for subscription status ..."),
    "update-account": ("I will update your account", "thanks", "Account has been updated with {detail}."),
}

# Each flow: (intent, [(action, values-template), ...]). Value templates use
# the customer fields; {level}/{amount}/... come from EXTRAS.
FLOWS = [
    ("manage_dispute_bill", [("pull-up-account", ["{name}"]), ("validate-purchase", ["{user}", "{email}", "{order}"]), ("search-faq", [])]),
    ("storewide_query", [("search-faq", []), ("select-faq", [])]),
    ("promo_code_invalid", [("pull-up-account", ["{name}"]), ("membership", ["{level}"]), ("promo-code", [])]),
    ("refund_initiate", [("pull-up-account", ["{name}"]), ("validate-purchase", ["{user}", "{email}", "{order}"]), ("record-reason", ["{reason}"]), ("offer-refund", ["{amount}"])]),
    ("shirt_question", [("search-faq", []), ("search-shirt", [])]),
    ("jacket_question", [("search-faq", []), ("search-jacket", []), ("search-faq", [])]),
    ("status_shipping_question", [("pull-up-account", ["{name}"]), ("shipping-status", ["{status}"])]),
    ("manage_change_address", [("pull-up-account", ["{name}"]), ("validate-purchase", ["{user}", "{email}", "{order}"]), ("update-order", ["{change}"])]),
    ("reset_2fa", [("pull-up-account", ["{name}"]), ("enter-details", ["{detail}"]), ("make-password", [])]),
    ("website_slow", [("log-out-in", []), ("try-again", []), ("notify-team", [])]),
    ("jeans_and_boots", [("search-jeans", []), ("search-boots", []), ("search-jeans", [])]),
    ("recover_username", [("pull-up-account", ["{name}"]), ("verify-identity", ["{user}", "{email}", "{order}"]), ("pull-up-account", ["{name}"])]),
    ("subscription_inquiry", [("pull-up-account", ["{name}"]), ("subscription-status", []), ("send-link", [])]),
    ("pricing_inquiry", [("search-pricing", [])]),
    ("account_update", [("update-account", ["{detail}"])]),
]

EXTRAS = [
    {"level": "gold", "amount": "$40", "reason": "changed my mind", "status": "in transit", "change": "express shipping", "detail": "new phone number"},
    {"level": "silver", "amount": "$95", "reason": "wrong size", "status": "delivered", "change": "standard shipping", "detail": "home address"},
    {"level": "bronze", "amount": "$12", "reason": "item arrived damaged", "status": "order received", "change": "a new address", "detail": "backup email"},
    {"level": "guest", "amount": "$61", "reason": "never arrived", "status": "shipped", "change": "overnight delivery", "detail": "billing zip"},
]


def fields(i):
    name, user, email, order = CUSTOMERS[i % len(CUSTOMERS)]
    return dict(name=name, user=user, email=email, order=order, **EXTRAS[i % len(EXTRAS)])


class Conversation:
    def __init__(self, convo_id, intent, use_ids):
        self.convo_id = convo_id
        self.intent = intent
        self.use_ids = use_ids
        self.turns = []

    def _count(self):
        return len(self.turns) + 1

    def customer(self, text):
        self.turns.append({"speaker": "customer", "text": text, "turn_count": self._count(), "targets": None, "candidates": []})

    def agent(self, text, distractors):
        cands = [text] + [d for d in distractors if d != text]
        # Put the gold utterance in different positions across conversations.
        shift = len(self.turns) % len(cands)
        cands = cands[shift:] + cands[:shift]
        idx = cands.index(text)
        if self.use_ids and all(c in UTTERANCES for c in cands):
            encoded = [UTTERANCES.index(c) for c in cands] + [-1]
        else:
            encoded = cands
        self.turns.append({
            "speaker": "agent", "text": text, "turn_count": self._count(),
            "targets": [self.intent, "retrieve_utterance", None, [], idx], "candidates": encoded,
        })

    def action(self, text, name, values):
        self.turns.append({
            "speaker": "action", "text": text, "turn_count": self._count(),
            "targets": [self.intent, "take_action", name, values, -1], "candidates": [],
        })

    def end(self, text):
        self.turns.append({
            "speaker": "agent", "text": text, "turn_count": self._count(),
            "targets": [self.intent, "end_conversation", None, [], -1], "candidates": [],
        })

    def to_json(self):
        return {"convo_id": self.convo_id, "delexed": self.turns}


def build_flow_conversation(convo_id, i, intent, steps, use_ids):
    f = fields(i)
    c = Conversation(convo_id, intent, use_ids)
    distract = [UTTERANCES[3], UTTERANCES[4], UTTERANCES[5], UTTERANCES[7]]
    c.customer("hi there")
    c.agent(GREETING, distract)
    c.customer("I have a question about " + intent.replace("_", " "))
    for name, templates in steps:
        prompt, reply, action_text = STEP_TEXT[name]
        c.agent(prompt, [GREETING, ANYTHING_ELSE, UTTERANCES[4]])
        c.customer(reply.format(**f))
        c.action(action_text.format(**f), name, [t.format(**f) for t in templates])
    c.agent(ANYTHING_ELSE, [GREETING, GOODBYE, UTTERANCES[5]])
    c.customer("no that is all, thanks")
    c.end(GOODBYE)
    return c


def build_no_action_conversation(convo_id, i, use_ids):
    c = Conversation(convo_id, "timing_question", use_ids)
    c.customer("hello")
    c.agent(GREETING, [UTTERANCES[3], UTTERANCES[7]])
    c.customer("how long does standard shipping usually take?")
    c.agent("standard shipping takes about five business days, usually sooner", [GREETING, ANYTHING_ELSE])
    c.customer("ok, that works for me")
    c.end(GOODBYE)
    return c


def build_abcd():
    splits = {"train": [], "dev": [], "test": []}
    n = 0
    # 15 flows x 2 in train, 1 in test; dev uses integer candidate ids.
    for rep in range(2):
        for k, (intent, steps) in enumerate(FLOWS):
            splits["train"].append(build_flow_conversation(str(1000 + n), n, intent, steps, False).to_json())
            n += 1
    for k, (intent, steps) in enumerate(FLOWS[:6]):
        splits["dev"].append(build_flow_conversation(str(2000 + k), n, intent, steps, True).to_json())
        n += 1
    for k, (intent, steps) in enumerate(FLOWS[6:]):
        splits["test"].append(build_flow_conversation(str(3000 + k), n, intent, steps, False).to_json())
        n += 1
    splits["train"].append(build_no_action_conversation("1900", n, False).to_json())
    splits["test"].append(build_no_action_conversation("3900", n + 1, True).to_json())
    return splits


def build_lenient():
    c = build_flow_conversation("5000", 0, "storewide_query", [("search-faq", [])], False).to_json()
    c["scenario_notes"] = "unknown field"
    del c["delexed"][0]["turn_count"]
    c["delexed"].insert(2, {"speaker": "customer", "text": "   ", "turn_count": 99, "targets": None, "candidates": []})
    return {"train": [c], "dev": [], "test": [c]}


# MultiWOZ: each dialogue is a list of user turns, each a list of
# (intent, {slot: value}) frames. System turns are interleaved automatically.
MW_DIALOGUES = {
    "train": [
        ("MUL0001.json", [[("find_restaurant", {"restaurant-area": "centre"})], [("find_restaurant", {"restaurant-area": "centre", "restaurant-food": "italian"})], [("book_restaurant", {"restaurant-bookday": "friday", "restaurant-bookpeople": "2"})]]),
        ("MUL0002.json", [[("find_hotel", {"hotel-pricerange": "cheap"})], [("book_hotel", {"hotel-bookstay": "3"})], [("find_train", {"train-departure": "cambridge", "train-destination": "london"})], [("book_train", {"train-bookpeople": "1"})]]),
        ("MUL0003.json", [[("find_attraction", {"attraction-type": "museum"})], [("find_restaurant", {"restaurant-food": "thai"})], [("find_attraction", {"attraction-area": "north"})]]),
        ("MUL0004.json", [[("find_taxi", {})], [("book_taxi", {"taxi-leaveat": "17.30", "taxi-destination": "the station"})]]),
        ("MUL0005.json", [[("find_hotel", {"hotel-area": "east"}), ("find_restaurant", {"restaurant-area": "east"})], [("find_restaurant", {"restaurant-area": "east"})], [("book_restaurant", {"restaurant-booktime": "19.00"})]]),
        ("SNG0006.json", [[("find_police", {})], [("find_police", {})]]),
        ("SNG0007.json", [[("find_hospital", {"hospital-department": "paediatrics"})]]),
        ("SNG0008.json", [[], []]),
        ("MUL0009.json", [[("find_bus", {})], [("find_train", {"train-day": "monday"})], [("find_bus", {})]]),
        ("MUL0010.json", [[("find_train", {"train-departure": "ely"})], [("find_train", {"train-departure": "ely", "train-leaveat": "09.15"})], [("book_train", {})], [("find_hotel", {"hotel-stars": "4"})], [("book_hotel", {"hotel-bookday": "sunday"})]]),
    ],
    "dev": [
        ("MUL0101.json", [[("find_restaurant", {"restaurant-pricerange": "expensive"})], [("book_restaurant", {})], [("find_taxi", {})], [("book_taxi", {"taxi-arriveby": "20.00"})]]),
        ("SNG0102.json", [[("find_attraction", {})]]),
        ("MUL0103.json", [[("find_hotel", {"hotel-type": "guesthouse"}), ("find_train", {"train-day": "friday"})], [("book_hotel", {}), ("book_train", {})]]),
        ("SNG0104.json", [[]]),
    ],
    "test": [
        ("MUL0201.json", [[("find_train", {"train-destination": "norwich"})], [("book_train", {"train-bookpeople": "4"})], [("find_attraction", {"attraction-name": "kings college"})]]),
        ("MUL0202.json", [[("find_restaurant", {"restaurant-food": "indian"})], [], [("find_restaurant", {"restaurant-food": "chinese"})]]),
        ("SNG0203.json", [[("find_hotel", {"hotel-parking": "yes", "hotel-internet": "yes"})], [("book_hotel", {"hotel-bookpeople": "2", "hotel-bookstay": "5"})]]),
        ("MUL0204.json", [[("find_police", {})], [("find_hospital", {})], [("book_taxi", {"taxi-departure": "the hospital"})]]),
    ],
}

SERVICE_OF = lambda intent: intent.split("_", 1)[1]


def build_multiwoz_dialogue(dialogue_id, user_turns):
    turns = []
    services = []
    for i, frames in enumerate(user_turns):
        mw_frames = []
        for intent, slots in frames:
            service = SERVICE_OF(intent)
            if service not in services:
                services.append(service)
            mw_frames.append({
                "service": service,
                "state": {"active_intent": intent, "requested_slots": [], "slot_values": {k: [v] for k, v in slots.items()}},
            })
        # An idle frame for a service the user is not talking about.
        mw_frames.append({"service": "general", "state": {"active_intent": "NONE", "requested_slots": [], "slot_values": {}}})
        wanted = ", ".join(intent.replace("_", " ") for intent, _ in frames) or "nothing in particular"
        turns.append({"turn_id": str(2 * i), "speaker": "USER", "utterance": "I would like to " + wanted + ".", "frames": mw_frames})
        turns.append({"turn_id": str(2 * i + 1), "speaker": "SYSTEM", "utterance": "Sure, I can help with that.", "frames": []})
    return {"dialogue_id": dialogue_id, "services": services, "turns": turns}


def write(path, obj):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(obj, f, indent=1, ensure_ascii=False)
        f.write("\n")


def main():
    write(os.path.join(HERE, "abcd", "abcd_fixture.json"), build_abcd())
    write(os.path.join(HERE, "abcd", "utterances.json"), UTTERANCES)
    write(os.path.join(HERE, "abcd_lenient.json"), build_lenient())
    for split, dialogues in MW_DIALOGUES.items():
        write(os.path.join(HERE, "multiwoz", split, "dialogues_001.json"),
              [build_multiwoz_dialogue(did, turns) for did, turns in dialogues])
    # Not a dialogue list; the loader must skip it when reading a directory.
    write(os.path.join(HERE, "multiwoz", "schema.json"), {"services": sorted({SERVICE_OF(i) for d in MW_DIALOGUES.values() for _, t in d for f in t for i, _ in f})})


if __name__ == "__main__":
    main()
