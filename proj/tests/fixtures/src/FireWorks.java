public class FireWorks implements Runnable {
    Node g, h, p, q;
    Thread t, s;
    boolean b1, b2;

    public FireWorks() {
        g = new Node();
        g.token = true;
        h = new Node();
        h.token = true;
        p = g.addNode();
        q = h.addNode();
    }

    public void start() {
        t = new Thread(this);
        s = new Thread(this);
        t.start();
        s.start();
    }

    public void run() {
        while (true) {
            Thread ct = Thread.currentThread();
            if (ct == t) {
                p = p.MoveNext();
            } else if (ct == s) {
                q = q.MoveBack();
            }
            try {
                if (ct == t) {
                    Thread.sleep(2000);
                } else if (ct == s) {
                    Thread.sleep(3000);
                }
            } catch (InterruptedException ie) {}
        }
    }

    public void actionPerformed() {
        boolean p1 = q.token;
        boolean p2 = p.token;
        if (p1) p2 = false;
        if (p2 && p1) {
            Y(50);
        } else
            launch();
    }

    private void launch() {
        System.out.println("launch");
    }

    private void Y(int k){
        int i, j;
        int t;
        int tmp;
        int[] A;
        if(k > 100) return;
        A = new int[100];
        for(i = 0; i < 100; i++){
            A[i] = i * 10 + k;
        }
        t = 0;
        for(i = 0; i < k; i++){
            t += A[i]/A[i-k];
        }
        System.out.println("k = " + k);
        System.out.println("t = " + t);
        for(i = 0; i < 100 ; i++){
            for(j = 0; j < k ; j++){
                A[i] = k + j;
            }
            System.out.println("A[" + i + "] = " + A[i]);
        }
        for(i = 0; i < 100 ; i++)
            for(j = 0; j < 100 ; j++) k += i * 5;
        System.out.println("k = " + k);
        // carrier capacity extension
        for(i = 0; i < 10 ; i++)
            for(j = 0; j < 10 ; j++) k+=i*10+j;
        for(i = 0; i < 20 ; i++)
            for(j = 0; j < 30 ; j++) k+=i*3-j;
        for(i = 0; i < 25 ; i++)
            for(j = 0; j < 20 ; j++) k+=i*4-j*3;
        System.out.println("k = " + k);
    }

    public static void main(String[] args) {
        new FireWorks().actionPerformed();
    }
}
