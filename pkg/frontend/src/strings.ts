// UI strings live here rather than inline so a translated table can be
// swapped in later. Only the English set ships.

export const STRINGS = {
  appTitle: "fieldalert dashboard",
  loginLabel: "Sign in as",
  staleBanner: "Connection lost, data may be stale",
  reloadHint: "retrying in the background",
  emptyQueue: "No reports waiting for review",
  reporterPhone: "Reporter phone",
  responsibleUnit: "Responsible unit",
  confirmations: "Confirmations",
  official: "official",
  user: "user",
  score: "score",
  attachments: "Attachments",
  noSelection: "Select a report on the map or in the queue",
  action: {
    Review: "Review",
    Verify: "Verify",
    Assign: "Assign",
    Merge: "Merge",
    Resolve: "Resolve",
    Update: "Update",
    AttachDocument: "Attach document",
  } as Record<string, string>,
} as const;
