/** Debounced, latest-wins preview scheduling.
 *
 * Slider drags fire many requests; we debounce them (default 150 ms) and
 * guarantee the final value is always rendered. At most one request is
 * interesting at a time: results from superseded requests are dropped, so a
 * slow early frame can never overwrite a newer one.
 */

export interface SchedulerHooks<Req, Res> {
  run: (req: Req) => Promise<Res>;
  onResult: (res: Res, req: Req) => void;
  onError?: (err: unknown, req: Req) => void;
}

export class RenderScheduler<Req, Res> {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private pending: Req | null = null;
  private issued = 0; // sequence of the newest request sent
  private settled = 0; // sequence of the newest settled request

  constructor(
    private hooks: SchedulerHooks<Req, Res>,
    private debounceMs = 150,
  ) {}

  /** Ask for a re-render with the newest parameters. */
  request(req: Req): void {
    this.pending = req;
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => this.fire(), this.debounceMs);
  }

  /** Skip the debounce delay (e.g. on drag end). */
  flush(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.fire();
  }

  get inFlight(): boolean {
    return this.issued > this.settled;
  }

  private fire(): void {
    this.timer = null;
    const req = this.pending;
    if (req === null) return;
    this.pending = null;
    const seq = ++this.issued;
    this.hooks
      .run(req)
      .then((res) => {
        if (seq > this.settled) {
          this.settled = seq;
          if (seq === this.issued) this.hooks.onResult(res, req);
        }
      })
      .catch((err) => {
        if (seq > this.settled) this.settled = seq;
        this.hooks.onError?.(err, req);
      });
  }
}
