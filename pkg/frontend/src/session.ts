import type { ApiClient } from "./api.js";
import type { ActorRow, PushMessage } from "./types.js";

export type MessageHandler = (messages: PushMessage[]) => void;

/**
 * A signed-in staff session: identity plus the long-poll loop that
 * drives live updates.
 *
 * The server tracks read cursors per subscriber, and directory actors
 * are subscribed to their own unit and actor topics the moment they
 * poll, so the loop only has to keep calling poll and hand whatever
 * arrives to the listeners. When a poll fails the session flips to
 * stale until the next round succeeds; listeners can surface that as a
 * banner.
 */
export class Session {
  readonly client: ApiClient;
  readonly actor: ActorRow;
  pollTimeoutMs: number;

  private running = false;
  private loopDone: Promise<void> = Promise.resolve();
  private handlers: MessageHandler[] = [];
  private staleHandlers: ((stale: boolean) => void)[] = [];
  private _stale = false;
  private _lastSync: number | null = null;

  constructor(client: ApiClient, actor: ActorRow, pollTimeoutMs = 2_000) {
    this.client = client;
    this.actor = actor;
    this.pollTimeoutMs = pollTimeoutMs;
  }

  get stale(): boolean {
    return this._stale;
  }

  /** Epoch millis of the last successful poll, or null before the first. */
  get lastSync(): number | null {
    return this._lastSync;
  }

  onMessages(handler: MessageHandler): void {
    this.handlers.push(handler);
  }

  onStaleChange(handler: (stale: boolean) => void): void {
    this.staleHandlers.push(handler);
  }

  start(): void {
    if (this.running) return;
    this.running = true;
    this.loopDone = this.loop();
  }

  async stop(): Promise<void> {
    this.running = false;
    await this.loopDone;
  }

  /** One poll round; exposed for tests that step the loop by hand. */
  async pollOnce(): Promise<PushMessage[]> {
    const messages = await this.client.poll(this.actor.actor_id, {
      timeoutMs: this.pollTimeoutMs,
    });
    this._lastSync = Date.now();
    this.setStale(false);
    if (messages.length > 0) {
      for (const handler of this.handlers) handler(messages);
    }
    return messages;
  }

  private setStale(value: boolean): void {
    if (value === this._stale) return;
    this._stale = value;
    for (const handler of this.staleHandlers) handler(value);
  }

  private async loop(): Promise<void> {
    while (this.running) {
      try {
        await this.pollOnce();
      } catch {
        this.setStale(true);
        // brief pause so a dead server is not hammered
        await new Promise((resolve) => setTimeout(resolve, 500));
      }
    }
  }
}
